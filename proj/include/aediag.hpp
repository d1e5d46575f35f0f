#pragma once

#include "aediag/error.hpp"
#include "aediag/lattice.hpp"
#include "aediag/algebra.hpp"
#include "aediag/diagram.hpp"
#include "aediag/ifo.hpp"
#include "aediag/analysis.hpp"
#include "aediag/protocols.hpp"
#include "aediag/io.hpp"
