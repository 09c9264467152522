#pragma once

// Symmetrizer construction and verification for the multiplication operator
// in matrix Sobolev spaces on [a,b].

#include "sobmat/config.hpp"
#include "sobmat/expr.hpp"
#include "sobmat/fixtures.hpp"
#include "sobmat/functions.hpp"
#include "sobmat/inner.hpp"
#include "sobmat/operators.hpp"
#include "sobmat/orthopoly.hpp"
#include "sobmat/polynomial.hpp"
#include "sobmat/quadrature.hpp"
#include "sobmat/report.hpp"
#include "sobmat/symmetrizer.hpp"
#include "sobmat/weight.hpp"
