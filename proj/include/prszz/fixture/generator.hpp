#pragma once

#include "prszz/eval/metrics.hpp"
#include "prszz/fixture/script.hpp"
#include "prszz/forge/model.hpp"

#include <filesystem>
#include <map>
#include <vector>

namespace prszz::fixture {

struct GeneratedFixture {
    std::filesystem::path repo_dir;
    std::filesystem::path snapshot_dir;
    std::filesystem::path truth_path;
    std::vector<vcs::ObjectId> mainline; // first-parent chain, creation order
    std::map<int, vcs::ObjectId> pr_resolving;
    forge::Snapshot snapshot;
    eval::GroundTruth truth;
};

// Replays the script into <out>/repo, <out>/snapshot, <out>/ground_truth.json
// and <out>/fixture_manifest.json. Identities and timestamps are fixed
// (Fixture Bot, epoch 1600000000 stepping 1000 s per action), so object ids
// are a pure function of the script. With `verify`, every declared inducing
// commit is checked against the brute-force replay oracle before anything is
// considered done; an unrealizable script raises FixtureError.
GeneratedFixture generate_fixture(const FixtureScript& script,
                                  const std::filesystem::path& out_dir,
                                  bool verify = true);

} // namespace prszz::fixture
