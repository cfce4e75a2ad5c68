// Copyright 2026 The meshtopo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "meshtopo/bpt.hpp"
#include "meshtopo/metrics.hpp"
#include "meshtopo/model.hpp"
#include "meshtopo/preference.hpp"

// JSON and JSON-lines records exchanged between pipeline stages. Readers
// raise kParse with `source:line` for malformed records.
namespace meshtopo::io {

struct TokenRecord {
  std::string id;
  std::string cond;  // optional
  bpt::TokenSequence seq;
};

std::string token_record(const TokenRecord& rec);
TokenRecord parse_token_record(std::string_view line);
std::vector<TokenRecord> read_token_records(std::istream& in,
                                            const std::string& source = "<stream>");

struct ReportRecord {
  metrics::QualityReport report;
  std::string cond;  // optional
};

std::string report_json(const metrics::QualityReport& report, const std::string& cond = {});
ReportRecord parse_report(std::string_view text);
// Accepts JSON-lines or a single (possibly multi-line) JSON object.
std::vector<ReportRecord> read_reports(std::istream& in, const std::string& source = "<stream>");

std::string triplet_record(const preference::PreferenceTriplet& t);
preference::PreferenceTriplet parse_triplet(std::string_view line);
std::vector<preference::PreferenceTriplet> read_triplets(std::istream& in,
                                                         const std::string& source = "<stream>");

std::string mask_record(const std::string& id, const preference::MaskVector& mask);

std::string model_json(const mdpo::ToyARModel& model);
mdpo::ToyARModel parse_model(std::string_view text);
void save_model(const mdpo::ToyARModel& model, const std::filesystem::path& path);
mdpo::ToyARModel load_model(const std::filesystem::path& path);

std::string log_record(std::size_t step, double loss, double margin);

struct SeamRecord {
  std::string id;
  std::vector<int> tokens;
};

std::string seam_record(const SeamRecord& rec);
std::vector<SeamRecord> read_seam_records(std::istream& in,
                                          const std::string& source = "<stream>");

std::string read_text(const std::filesystem::path& path);

}  // namespace meshtopo::io
