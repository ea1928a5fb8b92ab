#pragma once

#include <string>
#include <vector>

#include "vfn/graph/descriptor.hpp"

namespace vfn::graph {

// The three reference architectures, one descriptor row per table row.
// ReLU rides on the conv/fc layers as a fused command. The feature edge is
// the FC2 output in every net.

inline const char* kViplFaceNetText = R"(# viplfacenet: 7 conv + 3 fc, 227x227 input
layer data input shape=3,227,227 out=data
layer conv1 conv filters=48 kernel=9x9 stride=4 pad=0 act=relu in=data out=conv1
layer pool1 pool_max kernel=3x3 stride=2 in=conv1 out=pool1
layer conv2 conv filters=128 kernel=3x3 stride=1 pad=1 act=relu in=pool1 out=conv2
layer conv3 conv filters=128 kernel=3x3 stride=1 pad=1 act=relu in=conv2 out=conv3
layer pool2 pool_max kernel=3x3 stride=2 in=conv3 out=pool2
layer conv4 conv filters=256 kernel=3x3 stride=1 pad=1 act=relu in=pool2 out=conv4
layer conv5 conv filters=192 kernel=3x3 stride=1 pad=1 act=relu in=conv4 out=conv5
layer conv6 conv filters=192 kernel=3x3 stride=1 pad=1 act=relu in=conv5 out=conv6
layer conv7 conv filters=128 kernel=3x3 stride=1 pad=1 act=relu in=conv6 out=conv7
layer pool3 pool_max kernel=3x3 stride=2 in=conv7 out=pool3
layer flatten flatten in=pool3 out=flatten
layer fc1 fc outputs=4096 act=relu in=flatten out=fc1
layer drop1 dropout ratio=0.5 in=fc1 out=drop1
layer fc2 fc outputs=2048 act=relu in=drop1 out=fc2
layer drop2 dropout ratio=0.5 in=fc2 out=drop2
layer fc3 fc outputs=10575 in=drop2 out=fc3
feature fc2
)";

inline const char* kViplFaceNetFullText = R"(# viplfacenet_full: wider 7 conv + 3 fc variant
layer data input shape=3,227,227 out=data
layer conv1 conv filters=96 kernel=9x9 stride=4 pad=0 act=relu in=data out=conv1
layer pool1 pool_max kernel=3x3 stride=2 in=conv1 out=pool1
layer conv2 conv filters=192 kernel=3x3 stride=1 pad=1 act=relu in=pool1 out=conv2
layer conv3 conv filters=192 kernel=3x3 stride=1 pad=1 act=relu in=conv2 out=conv3
layer pool2 pool_max kernel=3x3 stride=2 in=conv3 out=pool2
layer conv4 conv filters=384 kernel=3x3 stride=1 pad=1 act=relu in=pool2 out=conv4
layer conv5 conv filters=256 kernel=3x3 stride=1 pad=1 act=relu in=conv4 out=conv5
layer conv6 conv filters=256 kernel=3x3 stride=1 pad=1 act=relu in=conv5 out=conv6
layer conv7 conv filters=192 kernel=3x3 stride=1 pad=1 act=relu in=conv6 out=conv7
layer pool3 pool_max kernel=3x3 stride=2 in=conv7 out=pool3
layer flatten flatten in=pool3 out=flatten
layer fc1 fc outputs=4096 act=relu in=flatten out=fc1
layer drop1 dropout ratio=0.5 in=fc1 out=drop1
layer fc2 fc outputs=2048 act=relu in=drop1 out=fc2
layer drop2 dropout ratio=0.5 in=fc2 out=drop2
layer fc3 fc outputs=10575 in=drop2 out=fc3
feature fc2
)";

inline const char* kAlexNetText = R"(# alexnet baseline: 5 conv + 3 fc with LRN and grouped convolutions
layer data input shape=3,227,227 out=data
layer conv1 conv filters=96 kernel=11x11 stride=4 pad=0 act=relu in=data out=conv1
layer lrn1 lrn size=5 alpha=0.0001 beta=0.75 k=1 in=conv1 out=lrn1
layer pool1 pool_max kernel=3x3 stride=2 in=lrn1 out=pool1
layer conv2 conv filters=256 kernel=5x5 stride=1 pad=2 group=2 act=relu in=pool1 out=conv2
layer lrn2 lrn size=5 alpha=0.0001 beta=0.75 k=1 in=conv2 out=lrn2
layer pool2 pool_max kernel=3x3 stride=2 in=lrn2 out=pool2
layer conv3 conv filters=384 kernel=3x3 stride=1 pad=1 act=relu in=pool2 out=conv3
layer conv4 conv filters=384 kernel=3x3 stride=1 pad=1 group=2 act=relu in=conv3 out=conv4
layer conv5 conv filters=256 kernel=3x3 stride=1 pad=1 group=2 act=relu in=conv4 out=conv5
layer pool3 pool_max kernel=3x3 stride=2 in=conv5 out=pool3
layer flatten flatten in=pool3 out=flatten
layer fc1 fc outputs=4096 act=relu in=flatten out=fc1
layer drop1 dropout ratio=0.5 in=fc1 out=drop1
layer fc2 fc outputs=4096 act=relu in=drop1 out=fc2
layer drop2 dropout ratio=0.5 in=fc2 out=drop2
layer fc3 fc outputs=10575 in=drop2 out=fc3
feature fc2
)";

inline std::vector<std::string> builtin_names() {
    return {"alexnet", "viplfacenet_full", "viplfacenet"};
}

inline NetworkDescriptor builtin(const std::string& name) {
    if (name == "viplfacenet") return parse_descriptor(kViplFaceNetText);
    if (name == "viplfacenet_full") return parse_descriptor(kViplFaceNetFullText);
    if (name == "alexnet") return parse_descriptor(kAlexNetText);
    throw UsageError("unknown builtin network '" + name +
                     "' (expected alexnet, viplfacenet_full or viplfacenet)");
}

}  // namespace vfn::graph
