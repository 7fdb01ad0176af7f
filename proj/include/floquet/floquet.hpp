#pragma once

#include "floquet/error.hpp"
#include "floquet/linalg.hpp"
#include "floquet/combinatorics.hpp"
#include "floquet/model.hpp"
#include "floquet/bloch.hpp"
#include "floquet/fermi.hpp"
#include "floquet/polynomial.hpp"
#include "floquet/polyalg.hpp"
#include "floquet/localdata.hpp"
#include "floquet/liouville.hpp"
#include "floquet/positive.hpp"
