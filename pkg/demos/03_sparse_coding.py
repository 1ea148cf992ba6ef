# coding: utf-8

# # Classifying by sparse reconstruction
#
# Put every training signature (after PCA) as a column of a dictionary. A new
# signature of class i should be well explained by a few class-i columns. So
# find a sparse code, then ask which class alone reconstructs the test vector
# best.

import numpy as np

from wifimd import classify

rng = np.random.default_rng(0)

# ## Subspace pursuit on a toy problem
#
# Twelve random unit atoms in eight dimensions, and a signal built from two
# of them.

A = rng.standard_normal((8, 12))
A /= np.linalg.norm(A, axis=0)
x = np.zeros(12)
x[[3, 7]] = [1.5, -0.8]
y = A @ x

code = classify.subspace_pursuit(A, y, K=2)
print("support", code.support, " coefficients", np.round(code.coefficients[list(code.support)], 3))
print("residual after each iteration:", np.round(code.residual_history, 6))

# ## Per-class residuals
#
# Three classes with four atoms each, clustered around class centres.

centres = rng.standard_normal((3, 8)) * 2
train = np.vstack([c + 0.3 * rng.standard_normal((4, 8)) for c in centres])
labels = np.repeat([1, 2, 3], 4)
D = classify.build_dictionary(train, labels)

test = centres[1] + 0.3 * rng.standard_normal(8)
label, residuals = classify.src_classify(D, test, K=3)
for cls, r in zip(D.classes, residuals):
    print(cls.name, "residual %.3f" % r)
print("decision:", label.name)

# ## The linear SVM baseline on the same data

svm = classify.train_linear_svm(train, labels, lam=0.1)
print("SVM decision:", classify.svm_classify(svm, test).name)
