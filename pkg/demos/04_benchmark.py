# coding: utf-8

# # The six-activity benchmark
#
# 170 simulated recordings per receiver channel (40 each of the three
# chair/floor motions, 10 falls, 20 each of the two mattress motions),
# performed by four simulated people. 40% of each class trains, the rest
# tests. Pass --quick for a small run.

import sys

from wifimd import harness

cfg = harness.ExperimentConfig()
if "--quick" in sys.argv:
    cfg = cfg.replace(counts={m: 6 for m in ["M1", "M2", "M3", "M4", "M5", "M6"]})

datasets = harness.build_datasets(cfg)
for ch, ds in datasets.items():
    print("channel %d: %d signatures of length %d" % (ch, len(ds), ds.dim))

reports = harness.run_on_datasets(datasets, cfg)
print(harness.format_accuracy_table(reports))

# Channel 2 is bistatic: a weaker echo and compressed Doppler make its
# signatures harder to tell apart.

src = next(r for r in reports if r.classifier == "SRC" and r.channel == 1)
print(harness.format_confusion_table(src))

# PCA keeps the components holding 95% of the training variance.

train, _ = harness.split_dataset(datasets[1], cfg.train_fraction, cfg.rng_seed)
models = harness.train_models(train, cfg)
print("PCA components:", models.pca_model.n_components)
