// Copyright 2026 The IIB Authors.
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

#ifndef IIB_IO_HPP_
#define IIB_IO_HPP_

#include <string>
#include <vector>

#include "iib/descriptor.hpp"

namespace iib {

// CSV rows "x,y[,radius[,angle_rad]]". Blank lines, lines starting with '#'
// and a leading "x,y,..." header are ignored. Empty radius fields take
// `default_radius`; empty angles mean upright.
std::vector<Keypoint> LoadKeypoints(const std::string& path,
                                    double default_radius = kDefaultRadius);
void SaveKeypoints(const std::vector<Keypoint>& keypoints,
                   const std::string& path);

// Binary descriptor file, little-endian:
//   "IIBD" u16 version(1) u8 family u8 granularity u8 mapping u8 overlap
//   u8 channel_count { u8 kind u8 name_length name }*
//   f64 radius u64 mask_hash u8 segments u32 bounds[segments + 1]
//   u32 count u32 bits
//   count x { f64 x f64 y f64 radius f64 angle(NaN = upright)
//             u32 source_index u8 bits[ceil(bits / 8)] }
void SaveDescriptorSet(const DescriptorSet& set, const std::string& path);
DescriptorSet LoadDescriptorSet(const std::string& path);

}  // namespace iib

#endif  // IIB_IO_HPP_
