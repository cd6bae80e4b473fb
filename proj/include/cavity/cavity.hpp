#pragma once

#include "cavity/audit.hpp"
#include "cavity/binomial.hpp"
#include "cavity/config.hpp"
#include "cavity/figures.hpp"
#include "cavity/fluctuation.hpp"
#include "cavity/fock.hpp"
#include "cavity/heisenberg.hpp"
#include "cavity/model.hpp"
