#pragma once

#include "jinet/error.hpp"
#include "jinet/linalg.hpp"
#include "jinet/model.hpp"
#include "jinet/spectral.hpp"
#include "jinet/refine.hpp"
#include "jinet/simgen.hpp"
#include "jinet/eval.hpp"
#include "jinet/io.hpp"
#include "jinet/sweep.hpp"
