// Copyright 2026 The jointmeas Authors
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


// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <exception>

#include "jointmeas/verify.hpp"

using namespace jointmeas;

int main() {
    VerifyOptions opt;
    opt.data_dir = std::string(JM_DATA_DIR) + "/hamiltonians";
    bool all = true;
    for (int c = 1; c <= static_cast<int>(verification_suites().size()); ++c) {
        const auto start = std::chrono::steady_clock::now();
        const CheckResult r = run_verification(opt, {c}).front();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && r.passed;
        std::printf("%s criterion %d (%s): %s [metric %.6g, threshold %.6g, %.1f s]\n", r.passed ? "PASS" : "FAIL",
                    r.criterion, r.name.c_str(), r.detail.c_str(), r.metric, r.threshold, secs);
        std::fflush(stdout);
    }
    std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all ? 0 : 1;
}
