"""Core raster types, configuration and shared utilities"""
