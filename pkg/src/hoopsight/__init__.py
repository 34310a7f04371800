"""hoopsight: basketball-video augmentation engine.

Post-processes player detections into identity-stable tracks, derives game
state and ability metrics from court tracking data, and turns them into
gaze-moderated overlay render commands streamed to an interactive viewer.
"""

__version__ = "0.1.0"
