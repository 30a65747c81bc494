"""Double-blind preference-annotation service and persistence."""

from .service import create_app
from .store import (RUBRIC, AnnotationError, AnnotationSession,
                    AnnotationStore, AnnotationTask, deblind,
                    load_annotation_tasks)

__all__ = [
    "create_app", "RUBRIC", "AnnotationError", "AnnotationSession",
    "AnnotationStore", "AnnotationTask", "deblind", "load_annotation_tasks",
]
