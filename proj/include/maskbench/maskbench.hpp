#pragma once

// Umbrella header for the masked-face synthesis and benchmarking toolkit.

#include "maskbench/blur.hpp"
#include "maskbench/color.hpp"
#include "maskbench/compose.hpp"
#include "maskbench/dataset.hpp"
#include "maskbench/error.hpp"
#include "maskbench/eval.hpp"
#include "maskbench/gallery.hpp"
#include "maskbench/geometry.hpp"
#include "maskbench/image.hpp"
#include "maskbench/io.hpp"
#include "maskbench/rng.hpp"
#include "maskbench/synthetic.hpp"
