// Copyright 2026 The filsa Authors.
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

#include "filsa/csv.hpp"

#include "filsa/error.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace filsa {

namespace {

void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

void append_vec(std::vector<std::string>& cells, const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) cells.push_back(format_double(v[i]));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(std::string_view cell) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw Error(ErrorCode::InvalidArgument, "malformed number '" + std::string(cell) + "' in CSV");
    return value;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buffer{};
    const auto [ptr, ec] =
        std::to_chars(buffer.data(), buffer.data() + buffer.size(), value, std::chars_format::general, 17);
    if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "number formatting failed");
    return std::string(buffer.data(), ptr);
}

std::string trace_csv(const IterateTrace& trace) {
    const Eigen::Index d = trace.dimension();
    std::string out;
    std::vector<std::string> header{"n", "t"};
    for (const char* prefix : {"x_", "z_", "M_"})
        for (Eigen::Index i = 1; i <= d; ++i) header.push_back(prefix + std::to_string(i));
    header.emplace_back("a");
    append_row(out, header);

    const std::size_t N = trace.size();
    std::vector<std::string> cells;
    for (std::size_t n = 0; n <= N; ++n) {
        cells.clear();
        cells.push_back(std::to_string(n));
        cells.push_back(format_double(trace.times[n]));
        append_vec(cells, trace.states[n]);
        if (n < N) {
            append_vec(cells, trace.drifts[n]);
            append_vec(cells, trace.noises[n]);
            cells.push_back(format_double(trace.steps[n]));
        } else {
            for (Eigen::Index i = 0; i < 2 * d + 1; ++i) cells.emplace_back();
        }
        append_row(out, cells);
    }
    return out;
}

IterateTrace parse_trace_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.size() < 2) throw Error(ErrorCode::InvalidArgument, "trace CSV has no data rows");
    const auto header = split(lines.front(), ',');
    if (header.size() < 6 || (header.size() - 3) % 3 != 0 || header[0] != "n" || header[1] != "t" ||
        header.back() != "a")
        throw Error(ErrorCode::InvalidArgument, "unexpected trace CSV header");
    const auto d = static_cast<Eigen::Index>((header.size() - 3) / 3);

    IterateTrace trace;
    const std::size_t rows = lines.size() - 1;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto cells = split(lines[r + 1], ',');
        if (cells.size() != header.size())
            throw Error(ErrorCode::InvalidArgument, "trace CSV row " + std::to_string(r) + " has wrong width");
        trace.times.push_back(parse_double(cells[1]));
        Vec x(d);
        for (Eigen::Index i = 0; i < d; ++i) x[i] = parse_double(cells[static_cast<std::size_t>(2 + i)]);
        trace.states.push_back(std::move(x));
        if (r + 1 == rows) break;
        Vec z(d);
        Vec m(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            z[i] = parse_double(cells[static_cast<std::size_t>(2 + d + i)]);
            m[i] = parse_double(cells[static_cast<std::size_t>(2 + 2 * d + i)]);
        }
        trace.drifts.push_back(std::move(z));
        trace.noises.push_back(std::move(m));
        trace.steps.push_back(parse_double(cells.back()));
    }
    trace.check_consistent();
    return trace;
}

std::string trajectory_csv(const Trajectory& trajectory) {
    const Eigen::Index d = trajectory.dimension();
    std::string out;
    std::vector<std::string> header{"t"};
    for (Eigen::Index i = 1; i <= d; ++i) header.push_back("x_" + std::to_string(i));
    header.emplace_back("mode");
    append_row(out, header);
    std::vector<std::string> cells;
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        cells.clear();
        cells.push_back(format_double(trajectory.times[i]));
        append_vec(cells, trajectory.points[i]);
        cells.push_back(trajectory.modes[i]);
        append_row(out, cells);
    }
    return out;
}

std::string tracking_csv(const TrackingReport& report) {
    std::string out = "window_index,n_start,t_start,T,error,noise_flag\n";
    for (std::size_t j = 0; j < report.errors.size(); ++j) {
        append_row(out, {std::to_string(j), std::to_string(report.window_starts[j]),
                         format_double(report.start_times[j]), format_double(report.window_T),
                         format_double(report.errors[j]), report.noise_flag ? "1" : "0"});
    }
    return out;
}

std::string residuals_csv(const DecayTable& table) {
    std::string out = "checkpoint_n,t_n,member_index,residual,envelope\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.member_residual.size(); ++i) {
            append_row(out, {std::to_string(row.checkpoint), format_double(row.time), std::to_string(i),
                             format_double(row.member_residual[i]), format_double(row.envelope)});
        }
    }
    return out;
}

std::string support_csv(const std::vector<SupportFractions>& rows) {
    std::string out = "eps,filippov_fraction,krasovskii_fraction\n";
    for (const auto& row : rows)
        append_row(out, {format_double(row.eps), format_double(row.filippov), format_double(row.krasovskii)});
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::IoFailure, "write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace filsa
