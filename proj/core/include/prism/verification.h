// Copyright 2026 The PRISM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The acceptance suite. Each criterion is a self-contained check with its
// tolerance fixed in code; `prism verify` and the acceptance test binary
// both run it.

#ifndef PRISM_VERIFICATION_H_
#define PRISM_VERIFICATION_H_

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace prism {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  double seconds = 0.0;
  std::string detail;
};

struct VerifyOptions {
  /// Criterion ids to run; empty runs all of them.
  std::vector<int> only;
  /// Corrupts the analytic SSM gradient so the gradient rows must fail.
  bool perturb_gradient = false;
};

CriterionResult CheckOracleEquivalence();
CriterionResult CheckGradients();
CriterionResult CheckRingGeometry();
CriterionResult CheckRotationRobustness();
CriterionResult CheckPcf();
CriterionResult CheckLinearScaling();
CriterionResult CheckOcclusion();
CriterionResult CheckDeterminismAndShape();

std::vector<CriterionResult> RunAcceptance(const VerifyOptions& options);

/// One "PASS|FAIL [id] name (cases, seconds) detail" line per criterion.
void PrintReport(const std::vector<CriterionResult>& results,
                 std::ostream& out);

bool AllPassed(const std::vector<CriterionResult>& results);

}  // namespace prism

#endif  // PRISM_VERIFICATION_H_
