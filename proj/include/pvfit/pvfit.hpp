#ifndef PVFIT_PVFIT_HPP
#define PVFIT_PVFIT_HPP

#include "pvfit/bnb.hpp"
#include "pvfit/constants.hpp"
#include "pvfit/dataset.hpp"
#include "pvfit/de.hpp"
#include "pvfit/harness.hpp"
#include "pvfit/interval.hpp"
#include "pvfit/model.hpp"
#include "pvfit/objective.hpp"
#include "pvfit/presets.hpp"
#include "pvfit/rng.hpp"

#endif  // PVFIT_PVFIT_HPP
