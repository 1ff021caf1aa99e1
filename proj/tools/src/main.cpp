#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "rnl/common.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "config file (key=value lines)");
    sub->add_option("--out", args.out_dir, "output directory (default: out)");
    sub->add_option("--seed", args.seed, "master seed (default: 0)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"residual network expressivity lab"};
    app.require_subcommand(1);

    CommonArgs args;
    for (const char* name : {"gradcheck", "regime", "bounds", "train", "levelset"})
        add_common(app.add_subcommand(name), args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        const rnlcli::ConfigMap cfg = args.config_path.empty()
                                          ? rnlcli::ConfigMap{}
                                          : rnlcli::ConfigMap::from_file(args.config_path);
        if (cmd == "gradcheck") return rnlcli::cmd_gradcheck(cfg, args.out_dir, args.seed);
        if (cmd == "regime") return rnlcli::cmd_regime(cfg, args.out_dir, args.seed);
        if (cmd == "bounds") return rnlcli::cmd_bounds(cfg, args.out_dir, args.seed);
        if (cmd == "train") return rnlcli::cmd_train(cfg, args.out_dir, args.seed);
        if (cmd == "levelset") return rnlcli::cmd_levelset(cfg, args.out_dir, args.seed);
        std::fprintf(stderr, "unknown command '%s'\n", cmd.c_str());
        return 2;
    } catch (const rnlcli::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rnl::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
}
