#pragma once

// Umbrella header for the repkit library: repetition-based exercise
// classification from IMU and pose-keypoint time series.

#define REPKIT_VERSION "0.1.0"

#include "repkit/config.hpp"
#include "repkit/error.hpp"
#include "repkit/evaluation.hpp"
#include "repkit/features.hpp"
#include "repkit/ingest.hpp"
#include "repkit/linear_model.hpp"
#include "repkit/matrix.hpp"
#include "repkit/parallel.hpp"
#include "repkit/pipeline.hpp"
#include "repkit/rng.hpp"
#include "repkit/rocket.hpp"
#include "repkit/segmentation.hpp"
#include "repkit/series.hpp"
#include "repkit/synth.hpp"
