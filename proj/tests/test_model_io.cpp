#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "tmpred/model_io.hpp"
#include "tmpred/rng.hpp"

using namespace tmpred;

namespace {

SavedModel make_model(std::uint64_t seed, bool peek_prev = false) {
    SavedModel m;
    m.net = Network::create(4, {5, 3}, 4, peek_prev);
    Rng rng(seed);
    m.net.init_weights(rng, 0.7);
    for (auto& v : m.net.output.bias) v = rng.uniform(-0.5, 0.5);
    // a few awkward values that decimal text would mangle
    m.net.layers[0].w_in_ig[0] = 0x1.fffffffffffffp-1;
    m.net.layers[0].w_rec_og[1] = -0.0;
    m.net.layers[1].peep_fg[2] = 1e-310;  // subnormal
    m.net.layers[1].bias_cell[0] = 1.0 / 3.0;
    m.window = 6;
    m.normalizer_scale = 1234.5678901234567;
    return m;
}

bool nets_identical(const Network& a, const Network& b) {
    if (a.layers.size() != b.layers.size()) return false;
    auto eq = [](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            // bit compare, so -0.0 vs 0.0 and NaN payloads count
            if (std::memcmp(&x[i], &y[i], sizeof(double)) != 0) return false;
        }
        return true;
    };
    for (std::size_t li = 0; li < a.layers.size(); ++li) {
        const auto& la = a.layers[li];
        const auto& lb = b.layers[li];
        if (la.n_inputs != lb.n_inputs || la.n_cells != lb.n_cells) return false;
        if (la.output_gate_peeks_previous_state != lb.output_gate_peeks_previous_state)
            return false;
        if (!eq(la.w_in_ig, lb.w_in_ig) || !eq(la.w_in_fg, lb.w_in_fg) ||
            !eq(la.w_in_og, lb.w_in_og) || !eq(la.w_in_cell, lb.w_in_cell) ||
            !eq(la.w_rec_ig, lb.w_rec_ig) || !eq(la.w_rec_fg, lb.w_rec_fg) ||
            !eq(la.w_rec_og, lb.w_rec_og) || !eq(la.w_rec_cell, lb.w_rec_cell) ||
            !eq(la.peep_ig, lb.peep_ig) || !eq(la.peep_fg, lb.peep_fg) ||
            !eq(la.peep_og, lb.peep_og) || !eq(la.bias_ig, lb.bias_ig) ||
            !eq(la.bias_fg, lb.bias_fg) || !eq(la.bias_og, lb.bias_og) ||
            !eq(la.bias_cell, lb.bias_cell))
            return false;
    }
    return a.output.n_inputs == b.output.n_inputs && a.output.n_outputs == b.output.n_outputs &&
           eq(a.output.w, b.output.w) && eq(a.output.bias, b.output.bias);
}

}  // namespace

TEST_CASE("save and load round trips every weight bit for bit") {
    for (bool peek : {false, true}) {
        const SavedModel m = make_model(17, peek);
        std::stringstream buf;
        save_model(m, buf);
        const SavedModel back = load_model(buf);
        CHECK(back.window == m.window);
        CHECK(std::memcmp(&back.normalizer_scale, &m.normalizer_scale, sizeof(double)) == 0);
        CHECK(nets_identical(back.net, m.net));

        // and a second generation is byte-identical text
        std::stringstream buf2;
        save_model(back, buf2);
        std::stringstream buf3;
        save_model(m, buf3);
        CHECK(buf2.str() == buf3.str());
    }
}

TEST_CASE("loaded model computes the same outputs") {
    const SavedModel m = make_model(23);
    std::stringstream buf;
    save_model(m, buf);
    const SavedModel back = load_model(buf);

    Rng rng(5);
    std::vector<double> window(4 * m.window);
    for (auto& v : window) v = rng.uniform(0.0, 1.0);
    const auto y1 = network_forward(m.net, window, m.window);
    const auto y2 = network_forward(back.net, window, m.window);
    CHECK(y1 == y2);
}

TEST_CASE("the format starts with a version tag and rejects other versions") {
    const SavedModel m = make_model(3);
    std::stringstream buf;
    save_model(m, buf);
    std::string text = buf.str();
    CHECK(text.rfind("tmpred-model 1\n", 0) == 0);

    std::stringstream bad("tmpred-model 99\n" + text.substr(text.find('\n') + 1));
    CHECK_THROWS_AS(load_model(bad), ParseError);

    std::stringstream not_model("something else\n");
    CHECK_THROWS_AS(load_model(not_model), ParseError);
}

TEST_CASE("malformed model files are rejected with parse errors") {
    const SavedModel m = make_model(9);
    std::stringstream buf;
    save_model(m, buf);
    const std::string text = buf.str();

    SUBCASE("truncated file") {
        std::stringstream t(text.substr(0, text.size() / 2));
        CHECK_THROWS_AS(load_model(t), ParseError);
    }
    SUBCASE("missing field") {
        std::string broken = text;
        const auto pos = broken.find("peep_ig");
        broken.erase(pos, broken.find('\n', pos) - pos + 1);
        std::stringstream t(broken);
        CHECK_THROWS_AS(load_model(t), ParseError);
    }
    SUBCASE("corrupt value") {
        std::string broken = text;
        const auto pos = broken.find("w_rec_fg ");
        broken.replace(pos + 9, 3, "zzz");
        std::stringstream t(broken);
        CHECK_THROWS_AS(load_model(t), ParseError);
    }
    SUBCASE("window zero") {
        std::string broken = text;
        const auto pos = broken.find("window 6");
        broken.replace(pos, 8, "window 0");
        std::stringstream t(broken);
        CHECK_THROWS_AS(load_model(t), ParseError);
    }
    SUBCASE("missing trailing end") {
        std::string broken = text.substr(0, text.rfind("end"));
        std::stringstream t(broken);
        CHECK_THROWS_AS(load_model(t), ParseError);
    }
}

TEST_CASE("saving an unusable model is refused") {
    SavedModel m;
    m.window = 3;
    std::stringstream buf;
    CHECK_THROWS_AS(save_model(m, buf), ConfigError);  // no layers

    SavedModel m2 = make_model(1);
    m2.window = 0;
    CHECK_THROWS_AS(save_model(m2, buf), ConfigError);
    SavedModel m3 = make_model(1);
    m3.normalizer_scale = 0.0;
    CHECK_THROWS_AS(save_model(m3, buf), ConfigError);
}

TEST_CASE("file level save and load work through paths") {
    const SavedModel m = make_model(41);
    const std::string path = "model_io_roundtrip.tmp";
    save_model(m, path);
    const SavedModel back = load_model(path);
    CHECK(nets_identical(back.net, m.net));
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model("definitely_missing_file.tmp"), IoError);
}
