/*
 * Copyright 2026 The SRA Tabular Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Umbrella header.

#pragma once

#include "sra/checkpoint.hpp"
#include "sra/csv.hpp"
#include "sra/dataset.hpp"
#include "sra/errors.hpp"
#include "sra/explain.hpp"
#include "sra/filter.hpp"
#include "sra/folds.hpp"
#include "sra/format.hpp"
#include "sra/gradcheck.hpp"
#include "sra/manifest.hpp"
#include "sra/metrics.hpp"
#include "sra/model.hpp"
#include "sra/pipeline.hpp"
#include "sra/preprocess.hpp"
#include "sra/rng.hpp"
#include "sra/selfcheck.hpp"
#include "sra/svg.hpp"
#include "sra/synthgen.hpp"
#include "sra/tape.hpp"
#include "sra/tensor.hpp"
#include "sra/training.hpp"
