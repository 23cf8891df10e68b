"""Image file I/O"""
