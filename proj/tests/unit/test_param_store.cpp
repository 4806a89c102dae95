#include <mochi/comms/param_store.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace mochi::comms;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("mochi_ps_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(ParamStore, SurvivesRestart) {
    const fs::path dir = scratch_dir("restart");
    const fs::path file = ParamStore::robot_file(dir, 2);
    EXPECT_EQ(file.filename(), "robot_2.json");
    {
        ParamStore s(file);
        s.set("ctl.k", 0.8f);
    }
    ParamStore again(file);
    EXPECT_EQ(again.get("ctl.k"), 0.8f);
    fs::remove_all(dir);
}

TEST(ParamStore, UnknownKeyThrows) {
    ParamStore s;
    EXPECT_THROW(s.get("nope"), KeyNotFound);
}

TEST(ParamStore, LastWriteWins) {
    const fs::path dir = scratch_dir("lww");
    ParamStore s(dir / "p.json");
    s.set("perc.p_act", 0.7f);
    s.set("perc.p_act", 0.9f);
    EXPECT_EQ(s.get("perc.p_act"), 0.9f);
    EXPECT_EQ(ParamStore(dir / "p.json").get("perc.p_act"), 0.9f);
    fs::remove_all(dir);
}

TEST(ParamStore, BadKeys) {
    ParamStore s;
    EXPECT_THROW(s.set("", 1.0f), std::invalid_argument);
    EXPECT_THROW(s.set("this.key.is.too.long", 1.0f), std::invalid_argument);
}

TEST(ParamStore, WriteFailureRollsBack) {
    const fs::path dir = scratch_dir("fail");
    fs::create_directories(dir);
    std::ofstream(dir / "plain") << "x";
    // The parent "directory" is a regular file, so nothing can be written below it.
    ParamStore s(dir / "plain" / "p.json");
    EXPECT_THROW(s.set("a", 1.0f), StorageFailure);
    EXPECT_FALSE(s.contains("a"));
    fs::create_directories(dir / "d.json");
    EXPECT_THROW(ParamStore(dir / "d.json"), StorageFailure);
    fs::remove_all(dir);
}

TEST(ParamStore, CorruptFileIsReported) {
    const fs::path dir = scratch_dir("corrupt");
    fs::create_directories(dir);
    std::ofstream(dir / "p.json") << "{not json";
    EXPECT_THROW(ParamStore(dir / "p.json"), StorageFailure);
    fs::remove_all(dir);
}
