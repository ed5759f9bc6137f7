#pragma once

#include "bench.hpp"
#include "config.hpp"
#include "degrade.hpp"
#include "fusion.hpp"
#include "image.hpp"
#include "image_io.hpp"
#include "lrr.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "patch.hpp"
#include "wavelet.hpp"
