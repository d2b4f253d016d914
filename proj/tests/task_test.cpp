#include <doctest.h>

#include "snaplab/task.hpp"

using namespace snaplab;

TEST_CASE("consensus validator: agreement and validity") {
  auto task = ColorlessTask::consensus();
  CHECK(validate_task(task, {"0", "1"}, {"0", "0"}));
  CHECK_FALSE(validate_task(task, {"0", "1"}, {"0", "1"}));
  CHECK_FALSE(validate_task(task, {"0", "1"}, {"2", "2"}));
  CHECK_FALSE(validate_task(task, {"0", "1"}, {}));
}

TEST_CASE("k-set validator rejects more than k distinct outputs") {
  auto task = ColorlessTask::k_set(2);
  CHECK_FALSE(validate_task(task, {"1", "2", "3"}, {"1", "2", "3"}));
  CHECK(validate_task(task, {"1", "2", "3"}, {"1", "2", "2"}));
  CHECK_FALSE(validate_task(task, {"1", "2"}, {"1", "9"}));
}

TEST_CASE("eps-agreement validator: range and spread") {
  auto task = ColorlessTask::eps_agreement(0.1);
  CHECK(validate_task(task, {"0", "1"}, {"0.5", "0.55"}));
  CHECK_FALSE(validate_task(task, {"0", "1"}, {"0.5", "0.65"}));
  CHECK_FALSE(validate_task(task, {"0.2", "1"}, {"0.1", "0.1"}));
}

TEST_CASE("validators are closed under output subsets") {
  Rng rng(7);
  std::vector<ColorlessTask> tasks = {ColorlessTask::consensus(), ColorlessTask::k_set(2),
                                      ColorlessTask::eps_agreement(0.5)};
  for (const auto& task : tasks) {
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<Value> inputs, outputs;
      int ni = 1 + rng.pick(4), no = 1 + rng.pick(4);
      for (int i = 0; i < ni; ++i) inputs.push_back(real_value(rng.pick(4) * 0.25));
      for (int i = 0; i < no; ++i) outputs.push_back(inputs[rng.pick(ni)]);
      if (!validate_task(task, inputs, outputs)) continue;
      // every nonempty subset must also validate
      for (int mask = 1; mask < (1 << no); ++mask) {
        std::vector<Value> sub;
        for (int i = 0; i < no; ++i)
          if (mask & (1 << i)) sub.push_back(outputs[i]);
        CHECK(validate_task(task, inputs, sub));
      }
    }
  }
}
