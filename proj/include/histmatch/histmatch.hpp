#ifndef HISTMATCH_HISTMATCH_HPP
#define HISTMATCH_HISTMATCH_HPP

// Umbrella header.

#include "histmatch/augment.hpp"
#include "histmatch/csv.hpp"
#include "histmatch/dataset.hpp"
#include "histmatch/error.hpp"
#include "histmatch/histogram.hpp"
#include "histmatch/image.hpp"
#include "histmatch/image_io.hpp"
#include "histmatch/inspect.hpp"
#include "histmatch/metrics.hpp"
#include "histmatch/parallel.hpp"
#include "histmatch/pipeline.hpp"
#include "histmatch/reference.hpp"
#include "histmatch/rng.hpp"

#endif // HISTMATCH_HISTMATCH_HPP
