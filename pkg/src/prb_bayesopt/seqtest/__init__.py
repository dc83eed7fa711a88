"""Confidence intervals, test schedules, and the adaptive threshold test."""
