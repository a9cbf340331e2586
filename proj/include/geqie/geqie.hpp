#pragma once

#include "geqie/benchmark.hpp"
#include "geqie/cosmicweb.hpp"
#include "geqie/encodings.hpp"
#include "geqie/errors.hpp"
#include "geqie/image.hpp"
#include "geqie/io.hpp"
#include "geqie/metrics.hpp"
#include "geqie/model.hpp"
#include "geqie/rng.hpp"
#include "geqie/simcore.hpp"
