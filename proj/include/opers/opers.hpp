#pragma once

#include "opers/corner.hpp"
#include "opers/matrix.hpp"
#include "opers/poly.hpp"
#include "opers/scalar.hpp"
#include "opers/wronskian.hpp"
#include "opers/qqbethe.hpp"
#include "opers/lax.hpp"
#include "opers/cmspace.hpp"
#include "opers/energy.hpp"
#include "opers/elimination.hpp"
#include "opers/opersolve.hpp"
