#pragma once

#include "nsme/units.hpp"
#include "nsme/errors.hpp"
#include "nsme/operators.hpp"
#include "nsme/bath.hpp"
#include "nsme/quadrature_oracle.hpp"
#include "nsme/generators.hpp"
#include "nsme/propagator.hpp"
#include "nsme/models.hpp"
