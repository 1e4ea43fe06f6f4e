"""Tests initialization"""
