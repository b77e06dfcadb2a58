#pragma once

// Umbrella header.

#include "kvsync/cli.hpp"
#include "kvsync/config.hpp"
#include "kvsync/errors.hpp"
#include "kvsync/experiments.hpp"
#include "kvsync/fourier.hpp"
#include "kvsync/galerkin.hpp"
#include "kvsync/io.hpp"
#include "kvsync/kato.hpp"
#include "kvsync/linstab.hpp"
#include "kvsync/model.hpp"
#include "kvsync/pde.hpp"
#include "kvsync/stationary.hpp"
