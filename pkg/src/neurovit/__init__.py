"""neurovit: volumetric vision-transformer training and evaluation toolkit.

Subpackages:

- ``data``       volume I/O, manifests, splits, synthetic generation
- ``autodiff``   dense float32 tensors with reverse-mode gradients
- ``model``      the 3D-patch vision transformer and checkpoints
- ``training``   Adam, schedules, mixup, train/fine-tune loops, search
- ``metrics``    ROC curve, AUC, Youden threshold, report
- ``radiomics``  GLCM texture features and a random-forest baseline
- ``experiments`` data-scaling protocol and output emission
- ``cli``        the ``neurovit`` command-line entry point
"""

__version__ = "0.1.0"
