// Copyright 2026 The mimu Authors
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


#include "mimu/imu_csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mimu/error.hpp"

namespace mimu {

namespace {

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void format_error(std::string_view source, std::size_t line,
                               const std::string& msg) {
  throw Error(ErrorKind::kFormatError, std::string(source) + ":" +
                                           std::to_string(line) + ": " + msg);
}

struct TimedSeries {
  ImuSeries series;
  std::vector<std::int64_t> t_ns;
};

TimedSeries parse_timed(std::string_view text, std::string_view source) {
  TimedSeries out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (!header_seen) {
      if (line != kImuCsvHeader) {
        format_error(source, line_no,
                     "expected header '" + std::string(kImuCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }

    std::array<std::string_view, 7> fields{};
    std::size_t n = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      if (n == fields.size()) {
        format_error(source, line_no, "too many fields");
      }
      fields[n++] = trim(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (n != fields.size()) {
      format_error(source, line_no, "expected 7 fields");
    }

    std::int64_t t = 0;
    {
      const auto f = fields[0];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), t);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        format_error(source, line_no, "bad timestamp '" + std::string(f) + "'");
      }
    }
    std::array<double, 6> v{};
    for (std::size_t i = 0; i < 6; ++i) {
      const auto f = fields[i + 1];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v[i]);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size() ||
          !std::isfinite(v[i])) {
        format_error(source, line_no, "bad value '" + std::string(f) + "'");
      }
    }
    if (!out.t_ns.empty() && t <= out.t_ns.back()) {
      format_error(source, line_no, "timestamps not strictly increasing");
    }
    out.t_ns.push_back(t);
    out.series.gyro.emplace_back(v[0], v[1], v[2]);
    out.series.accel.emplace_back(v[3], v[4], v[5]);
  }
  if (!header_seen) {
    format_error(source, line_no, "missing header");
  }
  if (out.t_ns.size() < 2) {
    format_error(source, line_no, "need at least two samples to infer the rate");
  }

  const double period = static_cast<double>(out.t_ns.back() - out.t_ns.front()) /
                        static_cast<double>(out.t_ns.size() - 1);
  for (std::size_t k = 1; k < out.t_ns.size(); ++k) {
    const double d = static_cast<double>(out.t_ns[k] - out.t_ns[k - 1]);
    if (std::abs(d - period) > kRateTolerance * period) {
      format_error(source, k + 2,
                   "sample interval " + std::to_string(d) +
                       " ns deviates more than 1% from " +
                       std::to_string(period) + " ns");
    }
  }
  out.series.freq = 1e9 / period;
  out.series.start_ns = out.t_ns.front();
  return out;
}

bool rates_agree(double a, double b) {
  return std::abs(a - b) <= kRateTolerance * std::min(a, b);
}

std::vector<ImuSeries> synchronize_timed(const std::vector<TimedSeries>& in,
                                         std::optional<double> expected_freq) {
  if (in.empty()) {
    return {};
  }
  for (const auto& s : in) {
    if (!rates_agree(s.series.freq, in.front().series.freq) ||
        (expected_freq && !rates_agree(s.series.freq, *expected_freq))) {
      throw Error(ErrorKind::kRateMismatch,
                  "IMU rates differ: " + std::to_string(s.series.freq) +
                      " Hz vs " +
                      std::to_string(expected_freq.value_or(in.front().series.freq)) +
                      " Hz");
    }
  }
  const double period = 1e9 / in.front().series.freq;
  const double half = 0.5 * period;

  std::int64_t start = std::numeric_limits<std::int64_t>::min();
  std::int64_t end = std::numeric_limits<std::int64_t>::max();
  for (const auto& s : in) {
    start = std::max(start, s.t_ns.front());
    end = std::min(end, s.t_ns.back());
  }
  if (start > end) {
    throw Error(ErrorKind::kEmptyOverlap, "IMU time spans do not overlap");
  }

  std::vector<std::size_t> first(in.size());
  std::size_t count = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto& t = in[i].t_ns;
    const auto lo = std::lower_bound(t.begin(), t.end(),
                                     static_cast<std::int64_t>(start - half));
    const auto hi = std::upper_bound(t.begin(), t.end(),
                                     static_cast<std::int64_t>(end + half));
    first[i] = static_cast<std::size_t>(lo - t.begin());
    count = std::min(count, static_cast<std::size_t>(hi - lo));
  }
  if (count == 0) {
    throw Error(ErrorKind::kEmptyOverlap, "IMU time spans do not overlap");
  }
  // First and last pairs bound the offset since all rates agree.
  for (const std::size_t k : {std::size_t{0}, count - 1}) {
    for (std::size_t i = 1; i < in.size(); ++i) {
      const double d = static_cast<double>(in[i].t_ns[first[i] + k] -
                                           in[0].t_ns[first[0] + k]);
      if (std::abs(d) > half) {
        throw Error(ErrorKind::kRateMismatch,
                    "IMU samples are not synchronized (offset " +
                        std::to_string(d) + " ns)");
      }
    }
  }

  std::vector<ImuSeries> out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    ImuSeries s;
    s.freq = in[i].series.freq;
    s.start_ns = in[i].t_ns[first[i]];
    s.gyro.assign(in[i].series.gyro.begin() + first[i],
                  in[i].series.gyro.begin() + first[i] + count);
    s.accel.assign(in[i].series.accel.begin() + first[i],
                   in[i].series.accel.begin() + first[i] + count);
    out.push_back(std::move(s));
  }
  return out;
}

TimedSeries timed_from(const ImuSeries& s) {
  s.validate();
  TimedSeries t;
  t.series = s;
  t.t_ns.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    t.t_ns.push_back(s.time_ns(k));
  }
  return t;
}

}  // namespace

std::string format_imu_csv(const ImuSeries& series) {
  series.validate();
  std::string out;
  out.reserve(series.size() * 120 + 32);
  out.append(kImuCsvHeader);
  out.push_back('\n');
  for (std::size_t k = 0; k < series.size(); ++k) {
    out.append(std::to_string(series.time_ns(k)));
    for (int i = 0; i < 3; ++i) {
      out.push_back(',');
      append_number(out, series.gyro[k](i));
    }
    for (int i = 0; i < 3; ++i) {
      out.push_back(',');
      append_number(out, series.accel[k](i));
    }
    out.push_back('\n');
  }
  return out;
}

ImuSeries parse_imu_csv(std::string_view text, std::string_view source) {
  return parse_timed(text, source).series;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::kIoError, "cannot write " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error(ErrorKind::kIoError, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::kIoError,
                "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

ImuSeries read_imu_csv(const std::filesystem::path& path) {
  return parse_imu_csv(read_text_file(path), path.string());
}

void write_imu_csv(const std::filesystem::path& path, const ImuSeries& series) {
  write_file_atomic(path, format_imu_csv(series));
}

std::vector<ImuSeries> ingest_csv(const std::vector<std::filesystem::path>& paths,
                                  std::optional<double> expected_freq) {
  std::vector<TimedSeries> timed;
  timed.reserve(paths.size());
  for (const auto& p : paths) {
    timed.push_back(parse_timed(read_text_file(p), p.string()));
  }
  return synchronize_timed(timed, expected_freq);
}

std::vector<ImuSeries> synchronize(const std::vector<ImuSeries>& series,
                                   std::optional<double> expected_freq) {
  std::vector<TimedSeries> timed;
  timed.reserve(series.size());
  for (const auto& s : series) {
    timed.push_back(timed_from(s));
  }
  return synchronize_timed(timed, expected_freq);
}

}  // namespace mimu
