#pragma once

#include "dnls/error.hpp"
#include "dnls/spectral_core.hpp"
#include "dnls/model.hpp"
#include "dnls/steppers.hpp"
#include "dnls/experiments.hpp"
#include "dnls/io.hpp"
