"""Timelapse studio: tile pyramids, guided video tours, and slideshows.

The package turns a directory of timelapse frames into a multi-resolution
tile pyramid, lets you author keyframe tours over it, compiles those tours
into wall-clock timelines, renders them to frame sequences, and shares them
as URL-encoded documents through an HTTP service.
"""

__version__ = "0.1.0"
