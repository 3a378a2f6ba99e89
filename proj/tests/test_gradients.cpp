// Copyright 2026 The semaug Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest_torch.hpp"
#include "gradcheck.hpp"

TEST_SUITE("gradients") {
  TEST_CASE("all four losses agree with central differences") {
    for (std::uint64_t seed : {1u, 2u}) {
      for (std::int64_t d : {2, 4}) {
        for (const auto& r : gradcheck::run_suite(seed, d)) {
          INFO(r.loss << " seed=" << seed << " d=" << d << " rel=" << r.rel_error);
          CHECK(r.entries > 0);
          CHECK(r.rel_error <= 1e-4);
          CHECK(r.kink_distance >= 1e-3);
        }
      }
    }
  }
}
