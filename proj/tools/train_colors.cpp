// train-colors: fit a color family to labeled grid cells of PNG frames
#include <mochi/io/family_json.hpp>
#include <mochi/io/png.hpp>
#include <mochi/perception/balloon.hpp>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace mochi;
using nlohmann::json;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Rect {
    int col, row, cols, rows;
};

json read_labels(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open labels " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        return json::array();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::vector<Rect> parse_rects(const json &entry) {
    std::vector<Rect> out;
    if (!entry.contains("rects") || !entry["rects"].is_array()) {
        throw InputError("label entry needs a rects array");
    }
    for (const json &r : entry["rects"]) {
        if (!r.is_array() || r.size() != 4) {
            throw InputError("rect must be [col, row, cols, rows] in cell units");
        }
        Rect rect{r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()};
        if (rect.col < 0 || rect.row < 0 || rect.cols < 1 || rect.rows < 1 ||
            rect.col + rect.cols > perception::kGridCols || rect.row + rect.rows > perception::kGridRows) {
            throw InputError("rect outside the 20x15 cell grid");
        }
        out.push_back(rect);
    }
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Train a color family from labeled frames"};
    std::string images;
    std::string labels;
    std::string out;
    std::string name;
    app.add_option("--images", images, "Directory of 320x240 PNG frames")->required();
    app.add_option("--labels", labels, "Label JSON with cell-unit rectangles")->required();
    app.add_option("--out", out, "Output family JSON")->required();
    app.add_option("--name", name, "Family name (overrides the label file)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    std::vector<Vec2> samples;
    try {
        const json doc = read_labels(labels);
        json entries = doc;
        if (doc.is_object()) {
            if (name.empty()) {
                name = doc.value("name", std::string{});
            }
            entries = doc.value("labels", json::array());
        }
        if (!entries.is_array()) {
            throw InputError("labels must be an array of {image, rects}");
        }
        for (const json &entry : entries) {
            if (!entry.is_object() || !entry.contains("image") || !entry["image"].is_string()) {
                throw InputError("label entry needs an image name");
            }
            const auto rects = parse_rects(entry);
            const perception::Frame frame =
                io::read_png(std::filesystem::path(images) / entry["image"].get<std::string>());
            perception::require_grid_frame(frame);
            const auto means = perception::cell_chroma(frame);
            for (const Rect &r : rects) {
                for (int row = r.row; row < r.row + r.rows; ++row) {
                    for (int col = r.col; col < r.col + r.cols; ++col) {
                        samples.push_back(means[perception::cell_index(row, col)]);
                    }
                }
            }
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    perception::ColorFamily family;
    try {
        family = perception::train_color_family(samples, name);
    } catch (const perception::InsufficientSamples &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    const Eigen::SelfAdjointEigenSolver<Mat2> eig(family.sigma);
    std::cout << "samples: " << samples.size() << '\n';
    std::cout << "mu: " << family.mu.x() << ' ' << family.mu.y() << '\n';
    std::cout << "sigma eigenvalues: " << eig.eigenvalues()(0) << ' ' << eig.eigenvalues()(1) << '\n';

    std::ofstream f(out, std::ios::trunc);
    if (!f) {
        std::cerr << "error: cannot write " << out << '\n';
        return 2;
    }
    f << io::family_to_json(family, samples.size()).dump(2) << '\n';
    return 0;
}
