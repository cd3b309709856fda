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

// Runs acceptance criteria 1-8 and prints one PASS/FAIL line for each.
// Exits 1 if any criterion fails.

#include <iostream>

#include "prism/verification.h"

int main() {
  const auto results = prism::RunAcceptance(prism::VerifyOptions{});
  prism::PrintReport(results, std::cout);
  return prism::AllPassed(results) ? 0 : 1;
}
