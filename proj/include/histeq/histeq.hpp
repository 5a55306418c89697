#pragma once

#include "histeq/compare.hpp"
#include "histeq/equalize.hpp"
#include "histeq/image.hpp"
#include "histeq/imageio.hpp"
#include "histeq/metrics.hpp"
