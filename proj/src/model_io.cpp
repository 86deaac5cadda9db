#include "tmpred/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tmpred/errors.hpp"

namespace tmpred {

namespace {

constexpr std::string_view kMagic = "tmpred-model";
constexpr int kVersion = 1;

void write_hex(std::ostream& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::hex);
    out.write(buf, res.ptr - buf);
}

void write_vector(std::ostream& out, std::string_view name, const std::vector<double>& v) {
    out << name;
    for (double x : v) {
        out.put(' ');
        write_hex(out, x);
    }
    out.put('\n');
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // next nonempty line; throws at end of stream
    std::string_view next() {
        for (;;) {
            if (!std::getline(in_, line_)) throw ParseError(line_no_, "unexpected end of model file");
            ++line_no_;
            if (!line_.empty() && line_.back() == '\r') line_.pop_back();
            if (!line_.empty()) return line_;
        }
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::string line_;
    std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

long long parse_ll(std::string_view tok, std::size_t line) {
    long long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
    return v;
}

double parse_hex_double(std::string_view tok, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v, std::chars_format::hex);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError(line, "expected a hex float, got '" + std::string(tok) + "'");
    return v;
}

// a line of the form "<name> <v0> <v1> ..." with exactly n values
std::vector<double> read_vector(LineReader& r, std::string_view name, std::size_t n) {
    const auto toks = split_ws(r.next());
    if (toks.empty() || toks[0] != name)
        throw ParseError(r.line_no(), "expected field '" + std::string(name) + "'");
    if (toks.size() != n + 1)
        throw ParseError(r.line_no(), "field '" + std::string(name) + "' must hold " +
                                          std::to_string(n) + " values");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = parse_hex_double(toks[i + 1], r.line_no());
    return v;
}

long long read_keyed_int(LineReader& r, std::string_view key) {
    const auto toks = split_ws(r.next());
    if (toks.size() != 2 || toks[0] != key)
        throw ParseError(r.line_no(), "expected line '" + std::string(key) + " <value>'");
    return parse_ll(toks[1], r.line_no());
}

}  // namespace

void save_model(const SavedModel& m, std::ostream& out) {
    if (m.net.layers.empty()) throw ConfigError("cannot save a network with no layers");
    if (m.window <= 0) throw ConfigError("model window must be positive");
    if (!(m.normalizer_scale > 0.0) || !std::isfinite(m.normalizer_scale))
        throw ConfigError("normalizer scale must be positive and finite");

    out << kMagic << ' ' << kVersion << '\n';
    out << "window " << m.window << '\n';
    out << "inputs " << m.net.n_inputs() << '\n';
    out << "outputs " << m.net.n_outputs() << '\n';
    out << "normalizer_scale ";
    write_hex(out, m.normalizer_scale);
    out.put('\n');
    out << "output_gate_peeks_previous_state "
        << (m.net.layers.front().output_gate_peeks_previous_state ? 1 : 0) << '\n';
    out << "layers " << m.net.layers.size() << '\n';
    for (std::size_t li = 0; li < m.net.layers.size(); ++li) {
        const LstmLayer& l = m.net.layers[li];
        out << "layer " << li << " inputs " << l.n_inputs << " cells " << l.n_cells << '\n';
        write_vector(out, "w_in_ig", l.w_in_ig);
        write_vector(out, "w_in_fg", l.w_in_fg);
        write_vector(out, "w_in_og", l.w_in_og);
        write_vector(out, "w_in_cell", l.w_in_cell);
        write_vector(out, "w_rec_ig", l.w_rec_ig);
        write_vector(out, "w_rec_fg", l.w_rec_fg);
        write_vector(out, "w_rec_og", l.w_rec_og);
        write_vector(out, "w_rec_cell", l.w_rec_cell);
        write_vector(out, "peep_ig", l.peep_ig);
        write_vector(out, "peep_fg", l.peep_fg);
        write_vector(out, "peep_og", l.peep_og);
        write_vector(out, "bias_ig", l.bias_ig);
        write_vector(out, "bias_fg", l.bias_fg);
        write_vector(out, "bias_og", l.bias_og);
        write_vector(out, "bias_cell", l.bias_cell);
    }
    out << "output inputs " << m.net.output.n_inputs << " outputs " << m.net.output.n_outputs
        << '\n';
    write_vector(out, "w", m.net.output.w);
    write_vector(out, "bias", m.net.output.bias);
    out << "end\n";
    if (!out) throw IoError("write failed while saving model");
}

void save_model(const SavedModel& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    save_model(m, f);
    f.flush();
    if (!f) throw IoError("write failed for '" + path + "'");
}

SavedModel load_model(std::istream& in) {
    LineReader r(in);

    {
        const auto toks = split_ws(r.next());
        if (toks.size() != 2 || toks[0] != kMagic)
            throw ParseError(r.line_no(), "not a model file");
        if (parse_ll(toks[1], r.line_no()) != kVersion)
            throw ParseError(r.line_no(), "unsupported model format version '" +
                                              std::string(toks[1]) + "'");
    }

    SavedModel m;
    m.window = static_cast<int>(read_keyed_int(r, "window"));
    const long long n_in = read_keyed_int(r, "inputs");
    const long long n_out = read_keyed_int(r, "outputs");
    {
        const auto toks = split_ws(r.next());
        if (toks.size() != 2 || toks[0] != "normalizer_scale")
            throw ParseError(r.line_no(), "expected line 'normalizer_scale <value>'");
        m.normalizer_scale = parse_hex_double(toks[1], r.line_no());
    }
    const long long peek = read_keyed_int(r, "output_gate_peeks_previous_state");
    const long long n_layers = read_keyed_int(r, "layers");

    if (m.window <= 0) throw ParseError(r.line_no(), "window must be positive");
    if (n_in <= 0 || n_out <= 0) throw ParseError(r.line_no(), "dimensions must be positive");
    if (!(m.normalizer_scale > 0.0) || !std::isfinite(m.normalizer_scale))
        throw ParseError(r.line_no(), "normalizer scale must be positive and finite");
    if (peek != 0 && peek != 1)
        throw ParseError(r.line_no(), "output_gate_peeks_previous_state must be 0 or 1");
    if (n_layers <= 0 || n_layers > 64) throw ParseError(r.line_no(), "unreasonable layer count");

    long long prev_width = n_in;
    for (long long li = 0; li < n_layers; ++li) {
        const auto toks = split_ws(r.next());
        if (toks.size() != 6 || toks[0] != "layer" || toks[2] != "inputs" || toks[4] != "cells")
            throw ParseError(r.line_no(), "expected line 'layer <i> inputs <I> cells <H>'");
        if (parse_ll(toks[1], r.line_no()) != li)
            throw ParseError(r.line_no(), "layers out of order");
        const long long l_in = parse_ll(toks[3], r.line_no());
        const long long l_cells = parse_ll(toks[5], r.line_no());
        if (l_in != prev_width)
            throw ParseError(r.line_no(), "layer input width does not match the previous layer");
        if (l_cells <= 0) throw ParseError(r.line_no(), "cell count must be positive");

        LstmLayer l = LstmLayer::create(static_cast<int>(l_in), static_cast<int>(l_cells),
                                        peek == 1);
        const std::size_t hi = static_cast<std::size_t>(l_cells) * l_in;
        const std::size_t hh = static_cast<std::size_t>(l_cells) * l_cells;
        const std::size_t h = static_cast<std::size_t>(l_cells);
        l.w_in_ig = read_vector(r, "w_in_ig", hi);
        l.w_in_fg = read_vector(r, "w_in_fg", hi);
        l.w_in_og = read_vector(r, "w_in_og", hi);
        l.w_in_cell = read_vector(r, "w_in_cell", hi);
        l.w_rec_ig = read_vector(r, "w_rec_ig", hh);
        l.w_rec_fg = read_vector(r, "w_rec_fg", hh);
        l.w_rec_og = read_vector(r, "w_rec_og", hh);
        l.w_rec_cell = read_vector(r, "w_rec_cell", hh);
        l.peep_ig = read_vector(r, "peep_ig", h);
        l.peep_fg = read_vector(r, "peep_fg", h);
        l.peep_og = read_vector(r, "peep_og", h);
        l.bias_ig = read_vector(r, "bias_ig", h);
        l.bias_fg = read_vector(r, "bias_fg", h);
        l.bias_og = read_vector(r, "bias_og", h);
        l.bias_cell = read_vector(r, "bias_cell", h);
        m.net.layers.push_back(std::move(l));
        prev_width = l_cells;
    }

    {
        const auto toks = split_ws(r.next());
        if (toks.size() != 5 || toks[0] != "output" || toks[1] != "inputs" || toks[3] != "outputs")
            throw ParseError(r.line_no(), "expected line 'output inputs <H> outputs <K>'");
        const long long o_in = parse_ll(toks[2], r.line_no());
        const long long o_out = parse_ll(toks[4], r.line_no());
        if (o_in != prev_width)
            throw ParseError(r.line_no(), "output layer width does not match the last layer");
        if (o_out != n_out)
            throw ParseError(r.line_no(), "output layer size does not match the header");
        m.net.output.n_inputs = static_cast<int>(o_in);
        m.net.output.n_outputs = static_cast<int>(o_out);
        m.net.output.w =
            read_vector(r, "w", static_cast<std::size_t>(o_out) * static_cast<std::size_t>(o_in));
        m.net.output.bias = read_vector(r, "bias", static_cast<std::size_t>(o_out));
    }

    if (r.next() != "end") throw ParseError(r.line_no(), "expected trailing 'end'");
    return m;
}

SavedModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    return load_model(f);
}

}  // namespace tmpred
