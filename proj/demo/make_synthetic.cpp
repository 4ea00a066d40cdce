// Writes a three-texture test raster (constant | checkerboard | salt-and-pepper)
// and a matching all-tissue mask, ready for `cishtex pipeline`.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "cishtex/image_io.hpp"
#include "cishtex/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic three-texture image"};
    int size = 1024;
    std::uint64_t seed = 7;
    std::string out = "synthetic.png";
    std::string mask;
    app.add_option("--size", size, "width and height in pixels")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "noise seed");
    app.add_option("--out", out, "output PNG");
    app.add_option("--mask", mask, "optional all-tissue mask PNG");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto img = cishtex::synthetic::three_texture_image(size, size, 0.5, seed);
        cishtex::save_png(out, img);
        if (!mask.empty()) {
            std::vector<std::uint8_t> full(static_cast<std::size_t>(size) * size, 255);
            cishtex::write_file_atomic(mask, cishtex::encode_png(size, size, 1, full));
        }
    } catch (const cishtex::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}
