#pragma once

#include "config.hpp"
#include "corpus.hpp"
#include "encoder.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "features.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "nerfilter.hpp"
#include "optimizer.hpp"
#include "pipeline.hpp"
#include "predictions_io.hpp"
#include "preprocess.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"
