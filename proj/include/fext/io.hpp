#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fext/grid.hpp"
#include "fext/hermitian.hpp"
#include "fext/quadrature.hpp"
#include "fext/solver.hpp"

namespace fext {

namespace io {

/// Fixed "%.17g" formatting: round-trips doubles exactly and keeps CSV output
/// byte-identical across reruns.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// RFC-4180 CSV with a mandatory header row; '.' decimal separator, no locale.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\r\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\r\n";
    }

    void row_values(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
        out_ << "\r\n";
    }

private:
    std::ofstream out_;
};

inline void write_matrix_csv(const std::filesystem::path& path, const HermitianMatrix& m) {
    // re, im interleaved per column
    std::vector<std::string> header;
    for (int j = 0; j < m.size(); ++j) {
        header.push_back("re_" + std::to_string(j));
        header.push_back("im_" + std::to_string(j));
    }
    CsvWriter csv(path, header);
    for (int i = 0; i < m.size(); ++i) {
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(2 * m.size()));
        for (int j = 0; j < m.size(); ++j) {
            row.push_back(m(i, j).real());
            row.push_back(m(i, j).imag());
        }
        csv.row_values(row);
    }
}

inline Eigen::MatrixXcd read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_matrix_csv: cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
        rows.push_back(std::move(cells));
    }
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != 2 * n)
            throw std::runtime_error("read_matrix_csv: ragged row");
        for (int j = 0; j < n; ++j)
            m(i, j) = {rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(2 * j)],
                       rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(2 * j + 1)]};
    }
    return m;
}

inline void write_field_csv(const std::filesystem::path& path, const GridField& field,
                            const std::string& axis_unit = "cycles") {
    std::vector<std::string> header;
    for (int a = 0; a < field.d; ++a) header.push_back("xi_" + std::to_string(a) + " [" + axis_unit + "]");
    header.push_back("re");
    header.push_back("im");
    CsvWriter csv(path, header);
    std::vector<double> xi;
    for (std::size_t i = 0; i < field.size(); ++i) {
        field.coord(i, xi);
        std::vector<double> row(xi.begin(), xi.end());
        row.push_back(field.values[i].real());
        row.push_back(field.values[i].imag());
        csv.row_values(row);
    }
}

inline void write_trace_csv(const std::filesystem::path& path, const SolverTrace& trace) {
    CsvWriter csv(path, {"iteration", "objective", "step [frobenius]", "nodes", "sigma_norm [frobenius]",
                         "floor_events"});
    for (const auto& r : trace.records) {
        csv.row({std::to_string(r.iteration), format_double(r.objective), format_double(r.step),
                 std::to_string(r.nodes), format_double(r.sigma_norm), std::to_string(r.floor_events)});
    }
}

inline void write_rule_csv(const std::filesystem::path& path, const QuadratureRule& rule) {
    std::vector<std::string> header;
    for (int a = 0; a < rule.d; ++a) header.push_back("xi_" + std::to_string(a) + " [cycles]");
    header.push_back("weight");
    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto node = rule.node(i);
        std::vector<double> row(node.begin(), node.end());
        row.push_back(rule.weights[i]);
        csv.row_values(row);
    }
}

/// Binary PGM (P5), maxval 255 or 65535 (16-bit big-endian). Values are
/// clamped to [lo, hi] then mapped linearly onto the gray range.
inline void write_pgm(const std::filesystem::path& path, const std::vector<double>& values, long rows,
                      long cols, double lo, double hi, int maxval = 255) {
    if (maxval != 255 && maxval != 65535) throw std::invalid_argument("write_pgm: maxval must be 255 or 65535");
    if (static_cast<long>(values.size()) != rows * cols) throw std::invalid_argument("write_pgm: size mismatch");
    if (!(hi > lo)) throw std::invalid_argument("write_pgm: need hi > lo");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path.string());
    out << "P5\n" << cols << " " << rows << "\n" << maxval << "\n";
    for (double v : values) {
        double t = (v - lo) / (hi - lo);
        if (t < 0) t = 0;
        if (t > 1) t = 1;
        const long g = std::lround(t * maxval);
        if (maxval == 255) {
            const unsigned char byte = static_cast<unsigned char>(g);
            out.write(reinterpret_cast<const char*>(&byte), 1);
        } else {
            const unsigned char hi_byte = static_cast<unsigned char>(g >> 8);
            const unsigned char lo_byte = static_cast<unsigned char>(g & 0xFF);
            out.write(reinterpret_cast<const char*>(&hi_byte), 1);
            out.write(reinterpret_cast<const char*>(&lo_byte), 1);
        }
    }
}

/// Rasterized line plot of sampled values (black polyline on white), for the
/// 1-d panels. Vertical range is padded from the data range.
inline void write_line_plot_pgm(const std::filesystem::path& path, const std::vector<double>& values,
                                long width = 768, long height = 256) {
    if (values.size() < 2) throw std::invalid_argument("write_line_plot_pgm: need at least two samples");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double pad = 0.05 * std::max(hi - lo, 1e-12);
    lo -= pad;
    hi += pad;
    std::vector<unsigned char> canvas(static_cast<std::size_t>(width * height), 255);
    auto plot = [&](long x, long y) {
        if (x >= 0 && x < width && y >= 0 && y < height)
            canvas[static_cast<std::size_t>(y * width + x)] = 0;
    };
    auto ycoord = [&](double v) {
        return static_cast<long>(std::lround((hi - v) / (hi - lo) * (height - 1)));
    };
    for (long x = 0; x + 1 < width; ++x) {
        const std::size_t i0 = static_cast<std::size_t>(x) * (values.size() - 1) / static_cast<std::size_t>(width - 1);
        const std::size_t i1 = static_cast<std::size_t>(x + 1) * (values.size() - 1) / static_cast<std::size_t>(width - 1);
        long y0 = ycoord(values[i0]);
        long y1 = ycoord(values[i1]);
        if (y0 > y1) std::swap(y0, y1);
        for (long y = y0; y <= y1; ++y) plot(x, y);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_line_plot_pgm: cannot open " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(canvas.data()), static_cast<std::streamsize>(canvas.size()));
}

// ---- IDX (MNIST ubyte) ----------------------------------------------------

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path, std::size_t offset) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) {
        std::ostringstream os;
        os << "IDX parse error in " << path << ": truncated file at offset " << offset;
        throw std::runtime_error(os.str());
    }
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

inline void write_be32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

struct IdxImages {
    long count = 0;
    long rows = 0;
    long cols = 0;
    std::vector<unsigned char> pixels;  // count * rows * cols
};

inline IdxImages read_idx_images(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_idx_images: cannot open " + path.string());
    const std::uint32_t magic = detail::read_be32(in, path.string(), 0);
    if (magic != 0x00000803) {
        std::ostringstream os;
        os << "IDX parse error in " << path.string() << ": bad magic 0x" << std::hex << magic
           << " at offset 0 (expected 0x00000803)";
        throw std::runtime_error(os.str());
    }
    IdxImages images;
    images.count = detail::read_be32(in, path.string(), 4);
    images.rows = detail::read_be32(in, path.string(), 8);
    images.cols = detail::read_be32(in, path.string(), 12);
    const std::size_t total = static_cast<std::size_t>(images.count) * images.rows * images.cols;
    images.pixels.resize(total);
    in.read(reinterpret_cast<char*>(images.pixels.data()), static_cast<std::streamsize>(total));
    if (static_cast<std::size_t>(in.gcount()) != total) {
        std::ostringstream os;
        os << "IDX parse error in " << path.string() << ": truncated pixel data at offset "
           << 16 + in.gcount();
        throw std::runtime_error(os.str());
    }
    return images;
}

inline std::vector<unsigned char> read_idx_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_idx_labels: cannot open " + path.string());
    const std::uint32_t magic = detail::read_be32(in, path.string(), 0);
    if (magic != 0x00000801) {
        std::ostringstream os;
        os << "IDX parse error in " << path.string() << ": bad magic 0x" << std::hex << magic
           << " at offset 0 (expected 0x00000801)";
        throw std::runtime_error(os.str());
    }
    const std::uint32_t count = detail::read_be32(in, path.string(), 4);
    std::vector<unsigned char> labels(count);
    in.read(reinterpret_cast<char*>(labels.data()), count);
    if (static_cast<std::uint32_t>(in.gcount()) != count) {
        std::ostringstream os;
        os << "IDX parse error in " << path.string() << ": truncated label data at offset " << 8 + in.gcount();
        throw std::runtime_error(os.str());
    }
    return labels;
}

inline void write_idx_images(const std::filesystem::path& path, long rows, long cols,
                             const std::vector<std::vector<unsigned char>>& images) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_idx_images: cannot open " + path.string());
    detail::write_be32(out, 0x00000803);
    detail::write_be32(out, static_cast<std::uint32_t>(images.size()));
    detail::write_be32(out, static_cast<std::uint32_t>(rows));
    detail::write_be32(out, static_cast<std::uint32_t>(cols));
    for (const auto& img : images) {
        if (static_cast<long>(img.size()) != rows * cols)
            throw std::invalid_argument("write_idx_images: image size mismatch");
        out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
    }
}

inline void write_idx_labels(const std::filesystem::path& path, const std::vector<unsigned char>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_idx_labels: cannot open " + path.string());
    detail::write_be32(out, 0x00000801);
    detail::write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

/// First `count` images carrying the requested label, normalized to [0,1]
/// row-major grids.
inline std::vector<std::vector<double>> load_idx_images(const std::filesystem::path& image_path,
                                                        const std::filesystem::path& label_path,
                                                        int digit, int count, long* rows_out = nullptr,
                                                        long* cols_out = nullptr) {
    if (count < 1) throw std::invalid_argument("load_idx_images: count must be >= 1");
    if (digit < 0 || digit > 9) throw std::invalid_argument("load_idx_images: digit must be 0..9");
    const IdxImages images = read_idx_images(image_path);
    const std::vector<unsigned char> labels = read_idx_labels(label_path);
    if (static_cast<long>(labels.size()) != images.count)
        throw std::runtime_error("load_idx_images: image/label counts disagree");
    std::vector<std::vector<double>> out;
    const std::size_t pixels = static_cast<std::size_t>(images.rows) * images.cols;
    for (long i = 0; i < images.count && static_cast<int>(out.size()) < count; ++i) {
        if (labels[static_cast<std::size_t>(i)] != digit) continue;
        std::vector<double> grid(pixels);
        const unsigned char* src = images.pixels.data() + static_cast<std::size_t>(i) * pixels;
        for (std::size_t p = 0; p < pixels; ++p) grid[p] = static_cast<double>(src[p]) / 255.0;
        out.push_back(std::move(grid));
    }
    if (static_cast<int>(out.size()) < count) {
        std::ostringstream os;
        os << "load_idx_images: only " << out.size() << " images with label " << digit << " (need "
           << count << ")";
        throw std::runtime_error(os.str());
    }
    if (rows_out) *rows_out = images.rows;
    if (cols_out) *cols_out = images.cols;
    return out;
}

// ---- manifest ---------------------------------------------------------------

inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sha256_file: cannot open " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("sha256_file: EVP context allocation failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 65536> buf;
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

struct Manifest {
    // (sha256, path relative to the output directory)
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::filesystem::path& out_dir, const std::string& relative) {
        entries.emplace_back(sha256_file(out_dir / relative), relative);
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("Manifest: cannot open " + path.string());
        for (const auto& [sha, rel] : entries) out << sha << "  " << rel << "\n";
    }
};

}  // namespace io

}  // namespace fext
