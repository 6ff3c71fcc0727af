#pragma once

#include "sigcalc/arith.hpp"
#include "sigcalc/bsgs.hpp"
#include "sigcalc/charsig.hpp"
#include "sigcalc/ecsig.hpp"
#include "sigcalc/ecurve.hpp"
#include "sigcalc/error.hpp"
#include "sigcalc/indexcalc.hpp"
#include "sigcalc/io.hpp"
#include "sigcalc/linalg.hpp"
#include "sigcalc/quadfield.hpp"
