#pragma once

#include "systocap/errors.hpp"
#include "systocap/gauge.hpp"
#include "systocap/lattice.hpp"
#include "systocap/embedding.hpp"
#include "systocap/capacity.hpp"
