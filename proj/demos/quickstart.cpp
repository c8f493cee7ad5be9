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

// Trains SRALinear on the 2-D toy function and prints a few attributions.

#include <cstdio>
#include <iostream>

#include "sra/sra.hpp"

int main() {
  using namespace sra;
  const synth::Sample s = synth::gen_f1(2000, 7);
  const TabularDataset data = s.dataset();
  const Split split = stratified_kfold(data.target, 5, 7).front();
  const TabularDataset train_part = data.subset(split.train);
  const TabularDataset test_part = data.subset(split.test);

  Preprocessor pre;
  const Tensor x_train = pre.fit_transform(train_part);
  const Split inner = validation_split(train_part.target, 0.1, 7);
  auto pick = [&](const std::vector<std::size_t>& rows) {
    std::vector<double> y;
    for (std::size_t r : rows) y.push_back(train_part.target[r]);
    return XY{x_train.gather_rows(rows), y};
  };

  TrainConfig cfg;
  cfg.max_epochs = 60;
  cfg.adam.lr = 1e-2;
  cfg.seed = 7;
  const SraLinearModel init = SraLinearModel::init(2, 8, TaskKind::kBinary, 7);
  const auto trained = train(init, pick(inner.train), pick(inner.test), cfg);

  const Tensor x_test = pre.transform(test_part);
  const std::vector<double> prob = predict(trained.model, x_test);
  std::printf("test AUCROC %.4f after %zu epochs (best %zu)\n",
              metrics::auc_roc(prob, test_part.target), trained.log.epochs.size(),
              trained.log.best_epoch);

  const auto ex = explain_batch(trained.model, x_test);
  for (std::size_t i = 0; i < 5; ++i) {
    const Explanation& e = ex[i];
    std::printf("x=(%+.2f, %+.2f) a=(%.2f, %.2f) contrib=(%+.2f, %+.2f) intercept=%+.2f p=%.3f\n",
                e.x[0], e.x[1], e.attention[0], e.attention[1], e.contributions[0],
                e.contributions[1], e.intercept, e.output);
  }
  return 0;
}
