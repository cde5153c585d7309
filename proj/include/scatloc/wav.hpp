// include/scatloc/wav.hpp

// Copyright 2026 The scatloc authors
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

#ifndef SCATLOC_WAV_HPP
#define SCATLOC_WAV_HPP

#include <string>

#include "scatloc/signal.hpp"

namespace scatloc {

/// Read a WAV file (PCM 16-bit or IEEE float32). Multichannel files yield
/// channel 0. PCM samples are scaled to [-1, 1).
TimeSignal read_wav(const std::string& path);

/// Write a mono IEEE float32 WAV file.
void write_wav(const std::string& path, const TimeSignal& sig);

}  // namespace scatloc

#endif  // SCATLOC_WAV_HPP
