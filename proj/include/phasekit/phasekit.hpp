#pragma once

#include "config.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "fock_oracle.hpp"
#include "hamiltonian_parser.hpp"
#include "moments.hpp"
#include "phase_space_model.hpp"
#include "polynomial.hpp"
#include "random.hpp"
#include "report.hpp"
#include "runner.hpp"
#include "sampler.hpp"
#include "sde.hpp"
