"""Method registry, run manifests and evaluation"""
