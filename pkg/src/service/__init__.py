# -*- coding: utf-8 -*-
"""
服务模块

组织实验流程并提供命令行子命令实现。
"""
