// Copyright 2026 The SynthAudit Authors
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

// JSON encoding of schemas, records, reports and call counters.

#include <cmath>
#include <limits>

#include "json.hpp"
#include "synthaudit/errors.h"
#include "synthaudit/metrics.h"
#include "synthaudit/provider.h"

namespace synthaudit {
namespace {

using Json = nlohmann::ordered_json;

Json Parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports a byte offset; the wire format is single-line, so
    // report it as a column on line 1.
    throw ParseError(std::string("malformed JSON: ") + e.what(), 1,
                     e.byte);
  }
}

Json BoundJson(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double BoundFromJson(const Json& j, double fallback) {
  return j.is_null() ? fallback : j.get<double>();
}

Json SchemaJson(const Schema& schema) {
  Json out = Json::array();
  for (const ColumnSchema& c : schema) {
    if (c.categorical()) {
      out.push_back({{"name", c.name}, {"kind", "cat"}, {"support", c.support}});
    } else {
      out.push_back({{"name", c.name},
                     {"kind", "num"},
                     {"min", BoundJson(c.min)},
                     {"max", BoundJson(c.max)}});
    }
  }
  return out;
}

Schema SchemaFromJsonValue(const Json& j) {
  if (!j.is_array()) throw SchemaMismatch("schema must be a JSON array");
  Schema schema;
  try {
    for (const Json& c : j) {
      std::string kind = c.at("kind").get<std::string>();
      std::string name = c.at("name").get<std::string>();
      if (kind == "cat") {
        schema.push_back(ColumnSchema::Categorical(
            name, c.at("support").get<std::vector<std::string>>()));
      } else if (kind == "num") {
        constexpr double kInf = std::numeric_limits<double>::infinity();
        schema.push_back(ColumnSchema::Continuous(
            name, BoundFromJson(c.value("min", Json()), -kInf),
            BoundFromJson(c.value("max", Json()), kInf)));
      } else {
        throw SchemaMismatch("unknown column kind '" + kind + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw SchemaMismatch(std::string("bad schema: ") + e.what());
  }
  ValidateSchema(schema);
  return schema;
}

Json RecordsJson(const Dataset& ds) {
  Json rows = Json::array();
  const Schema& schema = ds.schema();
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < schema.size(); ++c) {
      double v = ds.at(r, c);
      if (schema[c].categorical()) {
        row.push_back(schema[c].support[static_cast<std::size_t>(v)]);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Dataset RecordsFromJson(const Json& rows, const Schema& schema) {
  if (!rows.is_array()) throw SchemaMismatch("'records' must be an array");
  std::vector<double> values;
  values.reserve(rows.size() * schema.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Json& row = rows[r];
    if (!row.is_array() || row.size() != schema.size()) {
      throw SchemaMismatch("record " + std::to_string(r) + " does not have " +
                           std::to_string(schema.size()) + " cells");
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const Json& cell = row[c];
      if (schema[c].categorical()) {
        if (!cell.is_string()) {
          throw SchemaMismatch("record " + std::to_string(r) + ", column '" +
                               schema[c].name + "': expected a label");
        }
        auto code = schema[c].CodeOf(cell.get<std::string>());
        if (!code) {
          throw SchemaMismatch("record " + std::to_string(r) + ", column '" +
                               schema[c].name + "': unknown label '" +
                               cell.get<std::string>() + "'");
        }
        values.push_back(*code);
      } else {
        if (!cell.is_number()) {
          throw SchemaMismatch("record " + std::to_string(r) + ", column '" +
                               schema[c].name + "': expected a number");
        }
        values.push_back(cell.get<double>());
      }
    }
  }
  try {
    return Dataset(schema, std::move(values));
  } catch (const SchemaMismatch&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw SchemaMismatch(e.what());
  }
}

Json StatsJson(const DistanceStats& s) {
  return {{"pct5_synth", s.pct5_synth},
          {"pct5_test", s.pct5_test},
          {"mean_synth", s.mean_synth},
          {"mean_test", s.mean_test},
          {"pass", s.pass}};
}

DistanceStats StatsFromJson(const Json& j) {
  return {j.at("pct5_synth").get<double>(), j.at("pct5_test").get<double>(),
          j.at("mean_synth").get<double>(), j.at("mean_test").get<double>(),
          j.at("pass").get<bool>()};
}

Json ReportJson(const PrivacyReport& report) {
  Json j;
  j["ims"] = {{"share_synth", report.ims.share_synth},
              {"share_test", report.ims.share_test},
              {"pass", report.ims.pass}};
  j["dcr"] = StatsJson(report.dcr);
  j["nndr"] = StatsJson(report.nndr);
  j["all_pass"] = report.all_pass;
  return j;
}

PrivacyReport ReportFromJson(const Json& j) {
  PrivacyReport r;
  r.ims = {j.at("ims").at("share_synth").get<double>(),
           j.at("ims").at("share_test").get<double>(),
           j.at("ims").at("pass").get<bool>()};
  r.dcr = StatsFromJson(j.at("dcr"));
  r.nndr = StatsFromJson(j.at("nndr"));
  r.all_pass = j.at("all_pass").get<bool>();
  return r;
}

}  // namespace

std::string ReportToJson(const PrivacyReport& report) {
  return ReportJson(report).dump();
}

std::string SchemaToJson(const Schema& schema) {
  return SchemaJson(schema).dump();
}

Schema SchemaFromJson(const std::string& text) {
  return SchemaFromJsonValue(Parse(text));
}

std::string EncodeSampleResponse(const Dataset& ds) {
  Json j;
  j["records"] = RecordsJson(ds);
  j["schema"] = SchemaJson(ds.schema());
  return j.dump();
}

Dataset DecodeSampleResponse(const std::string& text) {
  Json j = Parse(text);
  if (!j.is_object() || !j.contains("schema") || !j.contains("records")) {
    throw SchemaMismatch("sample response needs 'records' and 'schema'");
  }
  return RecordsFromJson(j["records"], SchemaFromJsonValue(j["schema"]));
}

std::string EncodeRecords(const Dataset& ds) {
  Json j;
  j["records"] = RecordsJson(ds);
  return j.dump();
}

Dataset DecodeRecords(const std::string& text, const Schema& schema) {
  Json j = Parse(text);
  if (!j.is_object() || !j.contains("records")) {
    throw SchemaMismatch("request body needs a 'records' array");
  }
  return RecordsFromJson(j["records"], schema);
}

std::string EncodeMetricsResponse(const MetricsResponse& response) {
  Json j;
  j["flags"] = {{"ims", response.ims},
                {"dcr", response.dcr},
                {"nndr", response.nndr}};
  j["scores"] = response.scores ? ReportJson(*response.scores) : Json();
  return j.dump();
}

MetricsResponse DecodeMetricsResponse(const std::string& text) {
  Json j = Parse(text);
  MetricsResponse r;
  try {
    r.ims = j.at("flags").at("ims").get<bool>();
    r.dcr = j.at("flags").at("dcr").get<bool>();
    r.nndr = j.at("flags").at("nndr").get<bool>();
    if (j.contains("scores") && !j["scores"].is_null()) {
      r.scores = ReportFromJson(j["scores"]);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad metrics response: ") + e.what(), 1, 0);
  }
  return r;
}

std::string EncodeStats(const CallStats& stats) {
  Json j;
  j["sample_calls"] = stats.sample_calls;
  j["metric_calls"] = stats.metric_calls;
  return j.dump();
}

CallStats DecodeStats(const std::string& text) {
  Json j = Parse(text);
  try {
    return {j.at("sample_calls").get<std::size_t>(),
            j.at("metric_calls").get<std::size_t>()};
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad stats response: ") + e.what(), 1, 0);
  }
}

}  // namespace synthaudit
