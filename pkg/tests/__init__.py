# -*- coding: utf-8 -*-
"""测试模块"""
