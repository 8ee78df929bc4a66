#pragma once

#include "dowave/analysis.hpp"
#include "dowave/coefficients.hpp"
#include "dowave/errors.hpp"
#include "dowave/model.hpp"
#include "dowave/operators.hpp"
#include "dowave/reference.hpp"
#include "dowave/stepper.hpp"
#include "dowave/version.hpp"
