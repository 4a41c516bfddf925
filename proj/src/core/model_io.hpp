// Copyright 2026 The dlsvm Authors. All Rights Reserved.
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

#pragma once

#include <string>

#include "models.hpp"

namespace dlsvm::model {

inline constexpr int kFormatVersion = 1;

/// JSON text with a top-level format_version. Doubles are written in shortest
/// round-trip form, so loading reproduces every matrix bit for bit.
std::string SerializeModel(const TrainedModel& model);
TrainedModel DeserializeModel(const std::string& text);

void SaveModel(const TrainedModel& model, const std::string& path);
TrainedModel LoadModel(const std::string& path);

}  // namespace dlsvm::model
