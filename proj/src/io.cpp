#include "pdiff/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "pdiff/error.hpp"

namespace pdiff::io {

namespace {

struct Token {
    std::string text;
    std::size_t offset = 0;
    bool quoted = false;
};

class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    // Next non-blank, non-comment line split into tokens; false at EOF.
    bool next(std::vector<Token>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            tokens = split(line);
            if (tokens.empty() || tokens.front().text.front() == '#') continue;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
        throw InputError(source_ + ", line " + std::to_string(line_no_) + ", offset " +
                         std::to_string(offset) + ": " + msg);
    }

    int line() const noexcept { return line_no_; }
    const std::string& source() const noexcept { return source_; }

private:
    std::vector<Token> split(const std::string& line) {
        std::vector<Token> out;
        std::size_t i = 0;
        while (i < line.size()) {
            if (std::isspace(static_cast<unsigned char>(line[i]))) {
                ++i;
                continue;
            }
            Token t;
            t.offset = i;
            if (line[i] == '"') {
                const std::size_t close = line.find('"', i + 1);
                if (close == std::string::npos) fail("unterminated quoted expression", i);
                t.text = line.substr(i + 1, close - i - 1);
                t.quoted = true;
                i = close + 1;
            } else {
                while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
                t.text = line.substr(t.offset, i - t.offset);
            }
            out.push_back(std::move(t));
        }
        return out;
    }

    std::istream& in_;
    std::string source_;
    int line_no_ = 0;
};

double to_double(const LineReader& r, const Token& t) {
    double v = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    if (!t.quoted && first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.quoted || ec != std::errc() || ptr != last || !std::isfinite(v))
        r.fail("expected a number, got '" + t.text + "'", t.offset);
    return v;
}

int to_int(const LineReader& r, const Token& t) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (t.quoted || ec != std::errc() || ptr != t.text.data() + t.text.size())
        r.fail("expected an integer, got '" + t.text + "'", t.offset);
    return v;
}

void expect_key(const LineReader& r, const std::vector<Token>& tokens, const std::string& key,
                std::size_t values) {
    if (tokens.front().text != key) r.fail("expected '" + key + "'", tokens.front().offset);
    if (tokens.size() != values + 1)
        r.fail("'" + key + "' takes " + std::to_string(values) + " value(s)", tokens.front().offset);
}

GridSpec read_header(LineReader& r) {
    std::vector<Token> t;
    if (!r.next(t)) r.fail("missing 'dim' line", 0);
    expect_key(r, t, "dim", 1);
    const int dim = to_int(r, t[1]);
    if (dim < 1) r.fail("dim must be >= 1", t[1].offset);
    const auto n = static_cast<std::size_t>(dim);

    if (!r.next(t)) r.fail("missing 'origin' line", 0);
    expect_key(r, t, "origin", n);
    Eigen::VectorXd origin(dim);
    for (int i = 0; i < dim; ++i) origin[i] = to_double(r, t[static_cast<std::size_t>(i) + 1]);

    if (!r.next(t)) r.fail("missing 'h' line", 0);
    expect_key(r, t, "h", 1);
    const double h = to_double(r, t[1]);
    if (!(h > 0.0)) r.fail("h must be > 0", t[1].offset);

    if (!r.next(t)) r.fail("missing 'extents' line", 0);
    expect_key(r, t, "extents", n);
    Eigen::VectorXi extents(dim);
    for (int i = 0; i < dim; ++i) {
        const Token& tok = t[static_cast<std::size_t>(i) + 1];
        extents[i] = to_int(r, tok);
        if (extents[i] < 1) r.fail("extents must be >= 1", tok.offset);
    }
    return GridSpec(std::move(origin), h, std::move(extents));
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

} // namespace

GridSpec read_grid_spec(std::istream& in, const std::string& source) {
    LineReader r(in, source);
    return read_header(r);
}

GridFunction read_grid(std::istream& in, const std::string& source) {
    LineReader r(in, source);
    GridSpec spec = read_header(r);
    Eigen::VectorXd values(spec.size());
    Eigen::Index count = 0;
    std::vector<Token> t;
    while (r.next(t)) {
        if (t.size() != 1) r.fail("expected one value per line", t[1].offset);
        if (count == spec.size()) r.fail("more values than grid nodes", t[0].offset);
        values[count++] = to_double(r, t[0]);
    }
    if (count != spec.size())
        throw InputError(source + ": expected " + std::to_string(spec.size()) + " values, found " +
                         std::to_string(count));
    return GridFunction(std::move(spec), std::move(values));
}

GridSpec read_grid_spec(const std::filesystem::path& path) {
    auto in = open(path);
    return read_grid_spec(in, path.string());
}

GridFunction read_grid(const std::filesystem::path& path) {
    auto in = open(path);
    return read_grid(in, path.string());
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_grid_spec(const GridSpec& spec) {
    std::string out = "dim " + std::to_string(spec.dim()) + "\norigin";
    for (int i = 0; i < spec.dim(); ++i) out += " " + format_number(spec.origin()[i]);
    out += "\nh " + format_number(spec.h()) + "\nextents";
    for (int i = 0; i < spec.dim(); ++i) out += " " + std::to_string(spec.extents()[i]);
    out += "\n";
    return out;
}

std::string format_grid(const GridFunction& u) {
    std::string out = format_grid_spec(u.spec());
    for (Eigen::Index k = 0; k < u.values().size(); ++k) {
        out += format_number(u[k]);
        out += '\n';
    }
    return out;
}

StencilFile read_stencil_file(std::istream& in, const std::string& source) {
    LineReader r(in, source);
    StencilFile file;
    std::vector<Token> t;

    if (!r.next(t)) r.fail("missing 'dim' line", 0);
    expect_key(r, t, "dim", 1);
    file.dim = to_int(r, t[1]);
    if (file.dim < 1) r.fail("dim must be >= 1", t[1].offset);
    file.op.dim = file.dim;

    if (!r.next(t)) r.fail("missing 'h' line", 0);
    expect_key(r, t, "h", 1);
    file.h = to_double(r, t[1]);
    if (!(file.h > 0.0)) r.fail("h must be > 0", t[1].offset);

    if (!r.next(t)) r.fail("missing 'scale' line", 0);
    expect_key(r, t, "scale", 1);
    file.scale = to_int(r, t[1]);
    if (file.scale < 0) r.fail("scale must be >= 0", t[1].offset);

    const auto n = static_cast<std::size_t>(file.dim);
    while (r.next(t)) {
        expect_key(r, t, "term", n + 1);
        Eigen::VectorXd shift(file.dim);
        for (std::size_t i = 0; i < n; ++i) shift[static_cast<Eigen::Index>(i)] = to_double(r, t[i + 1]);
        const Token& c = t[n + 1];
        Expr coeff;
        if (c.quoted) {
            try {
                coeff = Expr::parse(c.text);
            } catch (const SyntaxError& err) {
                r.fail(err.what(), c.offset + 1 + err.offset());
            }
            if (coeff.max_variable() > file.dim)
                r.fail("coefficient references x" + std::to_string(coeff.max_variable()), c.offset);
        } else {
            coeff = Expr::constant(to_double(r, c));
        }
        file.op.terms.push_back({std::move(shift), std::move(coeff)});
        file.term_lines.push_back(r.line());
    }
    if (file.op.terms.empty()) throw InputError(source + ": stencil has no 'term' lines");
    return file;
}

StencilFile read_stencil_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_stencil_file(in, path.string());
}

Stencil to_stencil(const StencilFile& file, const std::string& source) {
    std::vector<StencilTerm> terms;
    for (std::size_t i = 0; i < file.op.terms.size(); ++i) {
        const auto& t = file.op.terms[i];
        const Eigen::VectorXd rounded = t.shift.array().round();
        if (rounded != t.shift)
            throw InputError(source + ", line " + std::to_string(file.term_lines[i]) +
                             ": grid application needs integer shifts");
        terms.push_back({rounded.cast<int>(), t.coeff});
    }
    return Stencil(file.dim, file.h, std::move(terms), file.scale);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw InputError("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace pdiff::io
