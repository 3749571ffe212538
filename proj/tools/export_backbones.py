# Copyright 2026 The COVIDX Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Exports ImageNet backbones as ONNX feature trunks for `covidx train`.

Each graph maps a [1, 3, S, S] tensor to the final convolutional feature map
[1, C, H, W]; covidx applies global average pooling. Next to every graph a
training config fragment is written.

Needs torch, torchvision and onnx; xception and nasnetlarge additionally need timm.
"""

import argparse
import json
import pathlib

import torch

# name -> (input size, builder(pretrained) returning a module that yields the feature map)
def _torchvision(name):
    import torchvision.models as tvm

    def build(pretrained):
        weights = "DEFAULT" if pretrained else None
        net = getattr(tvm, name)(weights=weights) if name != "inception_v3" else tvm.inception_v3(
            weights=weights, aux_logits=True, init_weights=not pretrained)
        if name == "resnet50":
            return torch.nn.Sequential(*list(net.children())[:-2])
        if name == "inception_v3":
            net.avgpool = torch.nn.Identity()
            net.dropout = torch.nn.Identity()
            net.fc = torch.nn.Identity()
            net.aux_logits = False
            net.AuxLogits = None

            class Trunk(torch.nn.Module):
                def __init__(self, inner):
                    super().__init__()
                    self.inner = inner

                def forward(self, x):
                    y = self.inner(x)
                    return y.reshape(y.shape[0], 2048, 8, 8)

            return Trunk(net)
        if name == "densenet121":
            return torch.nn.Sequential(net.features, torch.nn.ReLU())
        return net.features  # vgg16

    return build


def _timm(name):
    def build(pretrained):
        import timm

        return timm.create_model(name, pretrained=pretrained, num_classes=0, global_pool="")

    return build


BACKBONES = {
    "resnet50": (224, _torchvision("resnet50")),
    "inception_v3": (299, _torchvision("inception_v3")),
    "vgg16": (224, _torchvision("vgg16")),
    "densenet121": (224, _torchvision("densenet121")),
    "xception": (299, _timm("legacy_xception")),
    "nasnetlarge": (331, _timm("nasnetalarge")),
}


def _fold_initializer_identities(path):
    """Replaces Identity nodes over initializers, which older OpenCV importers reject."""
    import onnx

    model = onnx.load(str(path))
    graph = model.graph
    inits = {t.name: t for t in graph.initializer}
    kept = []
    for node in graph.node:
        if node.op_type == "Identity" and node.input[0] in inits:
            copy = onnx.TensorProto()
            copy.CopyFrom(inits[node.input[0]])
            copy.name = node.output[0]
            graph.initializer.append(copy)
        else:
            kept.append(node)
    del graph.node[:]
    graph.node.extend(kept)
    onnx.save(model, str(path))


def export(name, out_dir, pretrained):
    size, build = BACKBONES[name]
    net = build(pretrained).eval()
    path = out_dir / f"{name}.onnx"
    dummy = torch.zeros(1, 3, size, size)
    with torch.no_grad():
        torch.onnx.export(net, dummy, str(path), opset_version=11, input_names=["input"],
                          output_names=["features"], dynamo=False)
    _fold_initializer_identities(path)
    extractor = {"kind": "neural", "graph": path.name, "input_size": size, "normalization": "imagenet"}
    (out_dir / f"{name}.extractor.json").write_text(json.dumps(extractor, indent=2) + "\n")
    return path


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, required=True)
    parser.add_argument("--backbones", nargs="+", default=list(BACKBONES), choices=list(BACKBONES))
    parser.add_argument("--random-weights", action="store_true",
                        help="skip the ImageNet weight download (smoke testing only)")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.backbones:
        print(export(name, args.out, pretrained=not args.random_weights))


if __name__ == "__main__":
    main()
